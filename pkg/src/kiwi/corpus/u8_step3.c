void main()
{
  unsigned char x = 0;
  while (x < 200)
    x += 3;
  assert(x >= 200 && x <= 202);
}
