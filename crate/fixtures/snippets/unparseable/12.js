...
const z = 3;
