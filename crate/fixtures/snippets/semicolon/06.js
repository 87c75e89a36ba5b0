import x from 'y'
x()
