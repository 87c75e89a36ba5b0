switch (k) {
case 1:
break;
}
