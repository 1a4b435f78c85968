void main()
{
  signed char i = 100;
  while (i > -100)
    i = i - 5;
  assert(i <= -100 && i > -105);
}
