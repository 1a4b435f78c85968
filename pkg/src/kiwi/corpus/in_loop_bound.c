void main()
{
  int x = 0;
  while (__VERIFIER_nondet_bool())
  {
    if (x < 100)
      x++;
    assert(x <= 100);
  }
}
