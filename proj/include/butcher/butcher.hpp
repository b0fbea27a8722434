#pragma once

#include "butcher/aromatic.hpp"
#include "butcher/elementary.hpp"
#include "butcher/io.hpp"
#include "butcher/linalg.hpp"
#include "butcher/prelie.hpp"
#include "butcher/rational.hpp"
#include "butcher/series.hpp"
#include "butcher/tableau.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"
