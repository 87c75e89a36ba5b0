export { answer };
const answer = 1;
