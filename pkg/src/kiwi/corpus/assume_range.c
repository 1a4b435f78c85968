void main()
{
  int x = __VERIFIER_nondet_int();
  __CPROVER_assume(x >= 0 && x <= 50);
  while (x < 100)
    x = x + 10;
  assert(x <= 109);
}
