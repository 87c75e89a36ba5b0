var 1abc = 2;
