void main()
{
  unsigned char x = 0;
  while (x < 120)
  {
    if (x < 60)
      x = x + 2;
    else
      x = x + 1;
  }
  assert(x == 120);
}
