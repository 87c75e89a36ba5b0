try {
risky();
} catch (e) {
console.error(e);
}
