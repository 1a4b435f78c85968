void main()
{
  unsigned char x = 0;
  while (__VERIFIER_nondet_bool())
  {
    if (x < 200)
      x++;
  }
  assert(x <= 200);
}
