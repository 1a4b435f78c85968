void main()
{
  unsigned char x = 0;
  while (x < 100)
    x++;
  assert(x == 100);
}
