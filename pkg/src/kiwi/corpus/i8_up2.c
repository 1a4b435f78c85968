void main()
{
  signed char i = -100;
  while (i < 50)
    i = i + 2;
  assert(i >= 50 && i <= 51);
}
