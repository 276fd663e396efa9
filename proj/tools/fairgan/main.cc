// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/cli/commands.h"

int main(int argc, char** argv) { return fairgan::cli::RunCli(argc, argv); }
