void main()
{
  int x = 0;
  while (__VERIFIER_nondet_bool())
  {
    x = x + 2;
    assert(x != 8);
  }
}
