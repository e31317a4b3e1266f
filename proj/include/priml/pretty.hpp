#pragma once

#include <string>

#include "priml/ast.hpp"

namespace priml {

std::string show(const Priority &p);
std::string show(const Constraint &c);
std::string show(const TypePtr &t);
std::string show(const ExprPtr &e);
std::string show(const CmdPtr &m);

}  // namespace priml
