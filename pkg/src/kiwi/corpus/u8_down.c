void main()
{
  unsigned char x = 200;
  while (x > 10)
    x--;
  assert(x == 10);
}
