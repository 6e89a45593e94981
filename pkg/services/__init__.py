# Domain operations, one module per area
