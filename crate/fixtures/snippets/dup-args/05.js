var k = function named(z, z) {};
