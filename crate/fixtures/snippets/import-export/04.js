import def, { named } from 'mod';
named(def);
