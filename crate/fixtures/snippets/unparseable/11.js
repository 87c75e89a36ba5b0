const y = [1, 2;
