void main()
{
  unsigned char i = 0, t = 0;
  while (i < 2)
  {
    unsigned char j = 0;
    while (j < 1)
    {
      j++;
      t++;
    }
    i++;
  }
  assert(t != 2);
}
