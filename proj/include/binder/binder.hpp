#pragma once

#include "binder/enumerate.hpp"
#include "binder/error.hpp"
#include "binder/law_report.hpp"
#include "binder/law_suite.hpp"
#include "binder/model.hpp"
#include "binder/pcf.hpp"
#include "binder/sexpr.hpp"
#include "binder/signature.hpp"
#include "binder/term.hpp"
#include "binder/transport.hpp"
#include "binder/typed_signature.hpp"
#include "binder/typed_term.hpp"
#include "binder/unscoped.hpp"

namespace binder {

inline constexpr const char* version = "0.1.0";

}  // namespace binder
