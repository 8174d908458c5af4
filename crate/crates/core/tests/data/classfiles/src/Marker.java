interface Marker { void f(); }
