void main()
{
  int x = 0, phase = 0;
  while (x < 10)
  {
    if (phase == 0)
      x += 1;
    else
      x += 2;
    phase = 1;
  }
  assert(x <= 11);
}
