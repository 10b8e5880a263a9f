#include "hetsys/heterotic.hpp"
