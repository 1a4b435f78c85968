void main()
{
  int x = 0;
  while (__VERIFIER_nondet_int())
    x = x == 5 ? 1 : x;
  assert(x != 7);
}
