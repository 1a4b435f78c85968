void main()
{
  unsigned char i = 0;
  while (i < 3)
  {
    unsigned char j = 0;
    while (j < 2)
      j++;
    assert(j == 2);
    i++;
  }
  assert(i == 3);
}
