#pragma once

#include "tfcert/core.hpp"
#include "tfcert/quadrature.hpp"
#include "tfcert/tfops.hpp"
#include "tfcert/funcs.hpp"
#include "tfcert/certify.hpp"
#include "tfcert/oracle.hpp"
#include "tfcert/windowsearch.hpp"
#include "tfcert/json_io.hpp"
