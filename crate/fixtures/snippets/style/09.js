[1, 2].forEach((n) => {
        console.log(n);
    });
