#pragma once

#include "descent.hpp"
#include "f2.hpp"
#include "finite_field.hpp"
#include "homspace.hpp"
#include "local_solver.hpp"
#include "localfield.hpp"
#include "qfield.hpp"
#include "sharank.hpp"
#include "verify.hpp"
