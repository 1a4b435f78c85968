void main()
{
  signed char i = 20;
  while (i > 0)
    i = i - 7;
  assert(i != -1);
}
