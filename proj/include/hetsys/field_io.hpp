#pragma once
#include "hetsys/forms.hpp"
