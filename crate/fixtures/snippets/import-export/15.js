import def, * as ns from 'm';
ns.go(def);
