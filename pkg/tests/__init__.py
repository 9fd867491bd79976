# Tests for railcell
