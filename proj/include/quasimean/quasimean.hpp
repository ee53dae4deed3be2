#pragma once

#include "quasimean/axioms.hpp"
#include "quasimean/chisini.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/means.hpp"
#include "quasimean/sample.hpp"
