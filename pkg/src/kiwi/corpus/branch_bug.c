void main()
{
  int x = 0, y = 0;
  while (x < 4)
  {
    if (__VERIFIER_nondet_bool())
      y++;
    x++;
  }
  assert(y != 4);
}
