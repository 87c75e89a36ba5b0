function g(a) {
   if (a) {
  return a;
   }
}
