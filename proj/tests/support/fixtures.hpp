#pragma once

// Canonical handcrafted fixtures shared across test files.

#include "wndb_fixture.hpp"

namespace svtest {

// Noun hierarchy with two polysemous words:
//
//   entity(1) < physical_entity(2) < object(3) < whole(4)
//     whole < living_thing(5) < organism(6) < animal(7) < chordate(8)
//             < mammal(9) < rodent(10) < mouse#1(11)
//     whole < artifact(20) < instrumentality(21) < device(22)
//             < electronic_device(23) < mouse#2(24)
//     organism < person(30) < prey#2(31)
//     animal < prey#1(32)
//   object < unit(40)                      (monosemous)
//
// "mouse" senses are (animal, device); "prey" senses are (animal, person).
inline WndbFixture mouse_prey_fixture() {
  WndbFixture fix;
  fix.add('n', 1, {"entity"});
  fix.add('n', 2, {"physical_entity"});
  fix.add('n', 3, {"object"});
  fix.add('n', 4, {"whole"});
  fix.add('n', 5, {"living_thing"});
  fix.add('n', 6, {"organism"});
  fix.add('n', 7, {"animal"});
  fix.add('n', 8, {"chordate"});
  fix.add('n', 9, {"mammal"});
  fix.add('n', 10, {"rodent"});
  fix.add('n', 11, {"mouse"});
  fix.add('n', 20, {"artifact"});
  fix.add('n', 21, {"instrumentality"});
  fix.add('n', 22, {"device"});
  fix.add('n', 23, {"electronic_device"});
  fix.add('n', 24, {"mouse"});
  fix.add('n', 30, {"person"});
  fix.add('n', 32, {"prey"});
  fix.add('n', 31, {"prey"});
  fix.add('n', 40, {"unit"});
  fix.chain('n', "@", {11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  fix.chain('n', "@", {24, 23, 22, 21, 20, 4});
  fix.chain('n', "@", {31, 30, 6});
  fix.chain('n', "@", {32, 7});
  fix.chain('n', "@", {40, 3});
  // prey sense order: animal sense first
  fix.sense_order("prey", 'n', {32, 31});
  return fix;
}

// Three verbs sharing their first synset, each with a private second sense.
inline WndbFixture help_aid_assist_fixture() {
  WndbFixture fix;
  fix.add('v', 300, {"help", "aid", "assist"});
  fix.add('v', 302, {"help", "facilitate"});
  fix.add('v', 303, {"aid"});
  fix.add('v', 304, {"assist"});
  fix.chain('v', "@", {302, 300});
  fix.chain('v', "@", {303, 300});
  fix.chain('v', "@", {304, 300});
  return fix;
}

}  // namespace svtest
