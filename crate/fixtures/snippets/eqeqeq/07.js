const arr = items.filter((i) => i.id == id);
