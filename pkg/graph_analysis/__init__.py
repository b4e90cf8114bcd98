# Graph analysis package
