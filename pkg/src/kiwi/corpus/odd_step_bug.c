void main()
{
  unsigned x = 1;
  while (x < 10)
    x += 2;
  assert(x == 10);
}
