void main()
{
  assert(0);
}
