void main()
{
  unsigned x = 0, y = 0;
  while (x < 3)
    x++;
  while (y < x)
    y++;
  assert(y != 3);
}
