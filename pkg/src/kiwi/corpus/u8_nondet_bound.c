void main()
{
  unsigned char n = __VERIFIER_nondet_uchar();
  unsigned char i = 0;
  while (i < n)
    i++;
  assert(i == n);
}
