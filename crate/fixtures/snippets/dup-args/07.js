function three(a, a, a) {}
