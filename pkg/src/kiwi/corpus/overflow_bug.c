void main()
{
  unsigned char x = 250;
  while (__VERIFIER_nondet_bool())
    x++;
  assert(x >= 250);
}
