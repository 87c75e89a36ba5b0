  const indented = true;
