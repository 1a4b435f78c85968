void main()
{
  unsigned char i = 0, s = 0;
  while (i < 15)
  {
    i++;
    s = s + 2;
  }
  assert(s <= 30);
}
