void main()
{
  unsigned i = 0, j = 0;
  while (i < 5)
  {
    i++;
    j++;
  }
  assert(j <= 5);
}
