void main()
{
  int x = 0;
  while (__VERIFIER_nondet_bool())
  {
    if (x == 0)
      x = 1;
    else
      x = 0;
    assert(x >= 0 && x <= 1);
  }
}
