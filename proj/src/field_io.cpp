#include "hetsys/field_io.hpp"
