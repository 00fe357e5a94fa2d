// Umbrella header: the whole library.
#pragma once

#include "casa/affinity.hpp"
#include "casa/ast.hpp"
#include "casa/bench.hpp"
#include "casa/diag.hpp"
#include "casa/diffstats.hpp"
#include "casa/driver.hpp"
#include "casa/lexer.hpp"
#include "casa/ocap.hpp"
#include "casa/parser.hpp"
#include "casa/pretty.hpp"
#include "casa/resolve.hpp"
#include "casa/values.hpp"
#include "casa/vm.hpp"
#include "casa/walk.hpp"
#include "casa/wire.hpp"
