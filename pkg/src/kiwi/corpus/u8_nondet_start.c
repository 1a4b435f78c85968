void main()
{
  unsigned char x = __VERIFIER_nondet_uchar();
  __CPROVER_assume(x < 20);
  while (x < 60)
    x = x + 4;
  assert(x >= 60 && x < 64);
}
