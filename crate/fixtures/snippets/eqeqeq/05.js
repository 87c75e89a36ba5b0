const t = typeof v == 'string' ? 1 : 0;
