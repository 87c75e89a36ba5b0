const same = x == null;
