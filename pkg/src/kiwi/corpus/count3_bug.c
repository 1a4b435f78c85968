void main()
{
  int x = 0;
  while (x < 3)
    x++;
  assert(x != 3);
}
