async function main() {
  const r = await fetch(url);
  return r.json();
}
