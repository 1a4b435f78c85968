void main()
{
  unsigned char x = 0;
  while (x < 6)
    x++;
  assert(x != 6);
}
